# SmallCycleSet(4,19): the irretractable cycle set of size 4 whose diagonal is a 4-cycle.
# Entries are 0-indexed; row x lists x*0 x*1 x*2 x*3.
4
1 0 2 3
3 2 0 1
0 1 3 2
2 3 1 0
