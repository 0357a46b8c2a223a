"""Named random sub-streams derived from one root seed.

Each consumer draws from its own generator, so adding sensors never shifts the
boid initialisation and vice versa.
"""

import hashlib

import numpy as np

GENERATOR_ID = "numpy.random.PCG64"
BOID_INIT = "boid-init"
SENSOR_DEPLOY = "sensor-deploy"
STREAMS = (BOID_INIT, SENSOR_DEPLOY)


def derive_seed(seed: int, stream: str) -> int:
    digest = hashlib.sha256(f"{seed}-{stream}".encode()).hexdigest()
    return int(digest, 16) % (2**63)


def generator(seed: int, stream: str) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(seed, stream)))
