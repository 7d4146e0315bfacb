"""Binary checkpoint format for a trained agent.

Layout (all integers little-endian)::

    8 bytes   magic  b"UAVDCKPT"
    uint32    format version (1)
    uint32    header length N
    N bytes   UTF-8 JSON header, keys sorted
    ...       float64 little-endian arrays, back to back, in header order

The header lists the networks (name, layer sizes, activations) followed by
the agent metadata. Arrays follow in this order: for each network in
``networks`` order, W0, b0, W1, b1, ... (W row-major with shape
(fan_in, fan_out)); then Adam first and second moments for the actor and the
critic (m for all blocks, then v); then the normalizer mean and variance.
"""

from __future__ import annotations

import dataclasses
import json
import struct
from pathlib import Path

import numpy as np

from .ddpg import AgentConfig, DdpgAgent
from .neuralnet import MlpSpec, MlpWeights

MAGIC = b"UAVDCKPT"
VERSION = 1
NETWORKS = ("actor", "critic", "target_actor", "target_critic")


class CheckpointError(ValueError):
    pass


def _spec_of(agent: DdpgAgent, name: str) -> MlpSpec:
    return agent.actor_spec if "actor" in name else agent.critic_spec


def to_bytes(agent: DdpgAgent) -> bytes:
    cfg = dataclasses.asdict(agent.cfg)
    cfg["hidden_sizes"] = list(cfg["hidden_sizes"])
    header = {
        "networks": [
            {"name": n, "layer_sizes": list(_spec_of(agent, n).layer_sizes),
             "hidden_activation": _spec_of(agent, n).hidden_activation,
             "output_activation": _spec_of(agent, n).output_activation}
            for n in NETWORKS
        ],
        "num_users": agent.num_users,
        "num_uavs": agent.num_uavs,
        "a_max": agent.a_max,
        "agent_config": cfg,
        "adam": {
            name: {"lr": st.lr, "beta1": st.beta1, "beta2": st.beta2, "eps": st.eps, "step": st.step}
            for name, st in (("actor", agent.actor_opt), ("critic", agent.critic_opt))
        },
        "normalizer": {"count": agent.normalizer.count, "eps": agent.normalizer.eps},
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    chunks = [MAGIC, struct.pack("<II", VERSION, len(blob)), blob]
    for arr in _arrays(agent):
        chunks.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    return b"".join(chunks)


def _arrays(agent: DdpgAgent) -> list[np.ndarray]:
    arrays = []
    for name in NETWORKS:
        arrays += getattr(agent, name).params()
    for st in (agent.actor_opt, agent.critic_opt):
        arrays += st.m + st.v
    arrays += [agent.normalizer.mean, agent.normalizer.var]
    return arrays


def from_bytes(data: bytes) -> DdpgAgent:
    if data[:8] != MAGIC:
        raise CheckpointError("not a checkpoint file (bad magic)")
    version, n = struct.unpack_from("<II", data, 8)
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    header = json.loads(data[16: 16 + n].decode("utf-8"))
    cfg_fields = dict(header["agent_config"])
    cfg_fields["hidden_sizes"] = tuple(cfg_fields["hidden_sizes"])
    agent = DdpgAgent(header["num_users"], header["num_uavs"], header["a_max"], AgentConfig(**cfg_fields))
    for net in header["networks"]:
        spec = _spec_of(agent, net["name"])
        if list(spec.layer_sizes) != net["layer_sizes"]:
            raise CheckpointError(f"layer sizes of {net['name']} do not match the agent config")
    for name, st in (("actor", agent.actor_opt), ("critic", agent.critic_opt)):
        meta = header["adam"][name]
        st.lr, st.beta1, st.beta2, st.eps, st.step = (meta["lr"], meta["beta1"], meta["beta2"],
                                                      meta["eps"], meta["step"])
    agent.normalizer.count = header["normalizer"]["count"]
    agent.normalizer.eps = header["normalizer"]["eps"]
    offset = 16 + n
    for arr in _arrays(agent):
        size = arr.size * 8
        if offset + size > len(data):
            raise CheckpointError("checkpoint is truncated")
        arr[...] = np.frombuffer(data, dtype="<f8", count=arr.size, offset=offset).reshape(arr.shape)
        offset += size
    if offset != len(data):
        raise CheckpointError("trailing bytes after the last array")
    return agent


def save_checkpoint(agent: DdpgAgent, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(to_bytes(agent))
    return path


def load_checkpoint(path) -> DdpgAgent:
    return from_bytes(Path(path).read_bytes())


def weights_equal(a: MlpWeights, b: MlpWeights) -> bool:
    return all(np.array_equal(x, y) for x, y in zip(a.params(), b.params()))
