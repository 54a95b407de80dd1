x = -5
y = -x
print(- -x + y)
