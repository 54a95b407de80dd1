def f(v):
    return v + 1
print([f(1), f(2), f(f(3))])
