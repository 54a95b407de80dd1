def pick(c, a, b):
    return a if c else b
print(pick(True, 1, 2))
