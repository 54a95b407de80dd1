n = 10
def f(k):
    return k + n
print(f(1))
