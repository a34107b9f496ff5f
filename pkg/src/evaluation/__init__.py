# Evaluation package 