#!/usr/bin/env python3
"""Scriptable stand-in for an external pair scorer, used by the protocol tests.

Usage: stub_scorer.py BEHAVIOR [ARG]

Behaviors:
    constant V    always reply v=V (after a correct handshake)
    marker WORD   v=0.9 when hyp_a contains WORD and hyp_b does not,
                  0.1 in the mirrored case, 0.5 otherwise
    overrange     reply v=1.2
    wrong_id      reply with id+1
    malformed     reply with a non-JSON line
    exit          exit immediately after the handshake
    slow          sleep 60 s before replying
    bad_hello     reject the handshake
"""
import json
import sys
import time


def send(obj):
    sys.stdout.write(json.dumps(obj) + "\n")
    sys.stdout.flush()


def main():
    behavior = sys.argv[1] if len(sys.argv) > 1 else "constant"
    arg = sys.argv[2] if len(sys.argv) > 2 else "0.5"

    line = sys.stdin.readline()
    hello = json.loads(line)
    assert hello.get("op") == "hello"
    if behavior == "bad_hello":
        send({"ok": False})
        return 0
    send({"ok": True, "version": hello.get("version")})
    if behavior == "exit":
        return 0

    for line in sys.stdin:
        if not line.strip():
            continue
        try:
            req = json.loads(line)
        except json.JSONDecodeError:
            send({"id": None, "error": "bad json"})
            continue
        req_id = req.get("id")
        if behavior == "constant":
            send({"id": req_id, "v": float(arg)})
        elif behavior == "marker":
            in_a = arg in req.get("hyp_a", [])
            in_b = arg in req.get("hyp_b", [])
            v = 0.9 if in_a and not in_b else 0.1 if in_b and not in_a else 0.5
            send({"id": req_id, "v": v})
        elif behavior == "overrange":
            send({"id": req_id, "v": 1.2})
        elif behavior == "wrong_id":
            send({"id": req_id + 1, "v": 0.5})
        elif behavior == "malformed":
            sys.stdout.write("this is not json\n")
            sys.stdout.flush()
        elif behavior == "slow":
            time.sleep(60)
            send({"id": req_id, "v": 0.5})
        else:
            send({"id": req_id, "error": f"unknown behavior {behavior}"})
    return 0


if __name__ == "__main__":
    sys.exit(main())
