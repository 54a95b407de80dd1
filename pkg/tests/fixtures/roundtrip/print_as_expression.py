x = print(1)
print(x)
