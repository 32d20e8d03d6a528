"""
Driving the same computations through the command line front end
=================================================================

``eigenbundle`` (installed as a console script) prints ``key=value``
reports; here the entry point is called in-process.
"""
import os
import tempfile

from eigenbundle.cli import run

text, code = run(["analyze", "--field", "fixture:A", "--grid", "64x32"])
print(text, "exit", code)

text, code = run(["theta", "--field", "fixture:A", "--field", "fixture:B", "--grid", "64x32"])
print(text, "exit", code)

# write a sampled field to disk and analyze the file
with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "bloch3.ebf")
    run(["construct", "bloch", "--params", "3", "--grid", "64x32", "--out", path])
    text, code = run(["analyze", "--field", "file:" + path])
    print(text, "exit", code)

# a too-coarse mesh is reported, not guessed
print(run(["analyze", "--field", "fixture:A", "--grid", "8x5"])[0])
