# Data package 