"""Writes the gold FSMs and the evaluation fixture pairs.

Files are emitted in the canonical export form (sorted states and
transitions, two-space indentation) so that export/import round trips are
byte-identical.
"""
import json
import pathlib

HERE = pathlib.Path(__file__).parent


def fsm(protocol, initial, transitions, extra_states=()):
    states = sorted({initial, *extra_states, *[t[0] for t in transitions],
                     *[t[2] for t in transitions]})
    return {
        "version": "fsm/1",
        "protocol": protocol,
        "states": states,
        "initial": initial,
        "transitions": [{"from": f, "input": i, "to": t}
                        for f, i, t in sorted(set(transitions))],
    }


def write(rel, value):
    path = HERE / rel
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(value, indent=2) + "\n")


# FTP control-connection machine: four states, five commands.
FTP = [
    ("Not Connected", "CONNECT", "Authorization"),
    ("Authorization", "USER", "Authorization"),
    ("Authorization", "PASS", "Transaction"),
    ("Authorization", "QUIT", "Not Connected"),
    ("Transaction", "PORT", "Transaction"),
    ("Transaction", "QUIT", "Update"),
]
write("gold/ftp.json", fsm("FTP", "Not Connected", FTP))

# RTSP client state machine (RFC 2326, Appendix A.1).
RTSP = [
    ("Init", "SETUP", "Ready"),
    ("Init", "TEARDOWN", "Init"),
    ("Ready", "PLAY", "Playing"),
    ("Ready", "RECORD", "Recording"),
    ("Ready", "TEARDOWN", "Init"),
    ("Ready", "SETUP", "Ready"),
    ("Playing", "PAUSE", "Ready"),
    ("Playing", "TEARDOWN", "Init"),
    ("Playing", "PLAY", "Playing"),
    ("Playing", "SETUP", "Playing"),
    ("Recording", "PAUSE", "Ready"),
    ("Recording", "TEARDOWN", "Init"),
    ("Recording", "RECORD", "Recording"),
    ("Recording", "SETUP", "Recording"),
]
write("gold/rtsp.json", fsm("RTSP", "Init", RTSP))

# Ten-transition gold; the extracted machine drops one transition and adds
# two, so tp=9, fp=2, fn=1.
GOLD10 = [(f"S{i}", f"C{i}", f"S{(i + 1) % 5}") for i in range(5)] + \
         [(f"S{i}", f"D{i}", f"S{(i + 2) % 5}") for i in range(5)]
EXTRACTED = GOLD10[1:] + [("S0", "X1", "S3"), ("S4", "X2", "S2")]
write("eval/gold10.json", fsm("TOY", "S0", GOLD10))
write("eval/extracted_tp9_fp2_fn1.json", fsm("TOY", "S0", EXTRACTED))


def counts_pair(protocol, tp, fp, fn):
    triples = [(f"S{k % 7}", f"C{k}", f"S{(k * 3) % 7}") for k in range(tp + fp + fn)]
    gold = triples[:tp + fn]
    extracted = triples[:tp] + triples[tp + fn:]
    return (fsm(protocol, "S0", gold, [f"S{k}" for k in range(7)]),
            fsm(protocol, "S0", extracted, [f"S{k}" for k in range(7)]))


for name, protocol, tp, fp, fn in [("ftp_90_18_12", "FTP", 90, 18, 12),
                                   ("rtsp_18_4_3", "RTSP", 18, 4, 3)]:
    gold, extracted = counts_pair(protocol, tp, fp, fn)
    write(f"eval/{name}.gold.json", gold)
    write(f"eval/{name}.extracted.json", extracted)
