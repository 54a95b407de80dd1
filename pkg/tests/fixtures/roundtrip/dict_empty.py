d = {}
print(d)
