xs = [0, 0]
xs[0] = 5
xs[1] = xs[0] + 1
print(xs)
