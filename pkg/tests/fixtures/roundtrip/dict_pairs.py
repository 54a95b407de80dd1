d = {1: 2, 3: [4], True: False}
print(d)
print(d[3])
