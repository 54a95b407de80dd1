def f(x):
    return x
g = f
print(g(3))
print(f is g)
