print(not 1 == 2)
print((not 1) == 2)
