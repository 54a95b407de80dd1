x = 0
y = 1 if x == 0 else 2 if x == 1 else 3
print(y)
print((1 if x else 2) if x else 3)
