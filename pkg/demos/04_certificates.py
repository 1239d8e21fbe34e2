# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
#       format_version: '1.3'
# ---

# %% [markdown]
# # Witness certificates
#
# Every positive answer ships a JSON certificate that can be replayed without
# the search that produced it.

# %%
import json
import os
import subprocess
import sys
import tempfile

from pwitness.certificates import verify_certificate
from pwitness.engine import (conjugacy_distinguish, heisenberg_counterexample, heisenberg_presentation,
                             separate_from_subgroup)
from pwitness.quotients import Exhausted
from pwitness.words import free_group

F = free_group(["l", "f"])
cert = separate_from_subgroup(F, ["l"], "l f l^-1", 2)
print(cert.claim["statement"])
print(verify_certificate(cert.to_json()))

# %% [markdown]
# ## Tampering is detected

# %%
doc = json.loads(cert.to_json())
doc["homs"][0]["images"]["f"] = doc["homs"][0]["images"]["l"]
print(verify_certificate(json.dumps(doc)).valid)

# %% [markdown]
# ## A pair that no finite 3-group separates
# In the integer Heisenberg group x^2 and x^2 h are not conjugate, yet they are
# conjugate in every quotient H_3(Z/3^k).  The search exhausts its family.

# %%
print(heisenberg_counterexample(3, 2))
try:
    conjugacy_distinguish(heisenberg_presentation(), "x^2 h", 3, S=["x^2"])
except Exhausted as exc:
    print("exhausted:", exc)

# %% [markdown]
# ## Replaying from the command line

# %%
with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
    fh.write(cert.to_json())
out = subprocess.run([sys.executable, "-m", "pwitness", "verify", "--report", fh.name],
                     capture_output=True, text=True)
print(out.returncode, out.stdout)
os.unlink(fh.name)
