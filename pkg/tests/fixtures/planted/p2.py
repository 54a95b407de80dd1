x = 7
print(x)
a = 1 + 2
b = a + a
c = [a, b]
print(c[0] + c[1] + b)
print(c)
