import sys

# One point per input line: "resistance load". Failure when load exceeds resistance.
for line in sys.stdin:
    r, s = map(float, line.split())
    print(r - s, flush=True)
