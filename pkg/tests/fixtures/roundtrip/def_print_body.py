def show(v):
    print(v)
    print([v])
show(3)
