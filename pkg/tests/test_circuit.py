import pytest

from paritybench.circuit import Circuit, Gate, gate_summary


def test_append_validates():
    c = Circuit(3)
    c.append("CNOT", (0, 1))
    with pytest.raises(ValueError):
        c.append("CNOT", (0, 3))
    with pytest.raises(ValueError):
        c.append("CNOT", (1, 1))
    with pytest.raises(ValueError):
        c.append("RZ", (0,), float("inf"))
    with pytest.raises(ValueError):
        c.append("TOFFOLI", (0, 1, 2))


def test_summary_counts():
    gates = [Gate("CNOT", (0, 1)), Gate("SWAP", (1, 2)), Gate("BRIDGE", (0, 1, 2)), Gate("ZZZZ", (0, 1, 2, 3), 0.1)]
    s = gate_summary(gates)
    assert s == {"n_cnot": 1, "n_swap": 1, "n_bridge": 1, "n_zzzz": 1, "cnot_equivalent": 1 + 3 + 4}


def test_json_roundtrip():
    c = Circuit(4, embedding="gm")
    c.append("H", (0,))
    c.append("RZ", (1,), 0.25)
    c.append("CNOT", (0, 1))
    again = Circuit.from_dict(c.to_dict())
    assert again.gates == c.gates and again.num_qubits == 4
    assert c.to_dict()["gates"][1] == {"gate": "RZ", "q": [1], "angle": 0.25}
