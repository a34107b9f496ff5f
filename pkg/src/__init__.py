# SliceTrace package 