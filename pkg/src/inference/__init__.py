# Inference package 