n = eval(input())
m = [n, n + 1]
print(m[1])
