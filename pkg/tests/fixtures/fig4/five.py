x = 0
print(5)
x = x + 1
print(5)
x = x + 1
print(5)
x = x + 1
print(5)
