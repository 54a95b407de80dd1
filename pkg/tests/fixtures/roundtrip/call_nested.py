def g(a, b):
    return [a, b]
print(g(g(1, 2), g(3, 4)))
