a = []
print((a is a) is a)
