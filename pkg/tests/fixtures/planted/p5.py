def double(v):
    return v + v
print(double(5))
z = {1: True, 2: False}
print(z[2])
