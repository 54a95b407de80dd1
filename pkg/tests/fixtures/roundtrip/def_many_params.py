def add3(a, b, c):
    s = a + b
    return s + c
print(add3(1, 2, 3))
