# CLI package 