x = 1
y = x + x
z = y + x + 3
print(z)
