# Runtime package 