def touch(xs):
    xs[0] = 1
ys = [0]
touch(ys)
print(ys)
