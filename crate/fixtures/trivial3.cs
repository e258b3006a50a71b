# trivial cycle set: x*y = y
3
0 1 2
0 1 2
0 1 2
