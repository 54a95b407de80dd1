xs = [3, 4]
print(-xs[0])
print(-(1 + 2))
