"""
Driving a selection session over HTTP
=====================================

The same engine behind `serve`: every mutation returns the full session
state, so a client needs nothing but the session id.  Here the service runs
in-process; `groupsel serve` exposes the identical API on a real port for
the browser console.
"""

from fastapi.testclient import TestClient

from groupsel.groups import partition_to_dict
from groupsel.session import create_app
from groupsel.simulate import gen_heuristic

inst = gen_heuristic(n=200, seed=0)
client = TestClient(create_app())

state = client.post("/sessions", json={
    "x": inst.dataset.X.tolist(),
    "y": inst.dataset.y.tolist(),
    "groups": partition_to_dict(inst.partition),
    "config": {"lambda": 0.4},
}).json()
sid = state["id"]
print("session", sid, "phase:", state["phase"])
print("candidates:", [(c["group"], round(c["score"], 4), c["in_A_lambda"])
                      for c in state["candidates"]])

# picking outside A_lambda is refused and changes nothing
blocked = [c["group"] for c in state["candidates"] if not c["in_A_lambda"]]
if blocked:
    r = client.post(f"/sessions/{sid}/pick", json={"group": blocked[0]})
    print(f"pick {blocked[0]} ->", r.status_code, r.json()["detail"])

# one manual pick, then let the greedy policy run the session out
state = client.post(f"/sessions/{sid}/pick",
                    json={"group": state["candidates"][0]["group"]}).json()
print("after pick: iteration", state["iteration"],
      "active:", state["active_groups"])
state = client.post(f"/sessions/{sid}/auto", json={"steps": 100}).json()
print("after auto:", state["phase"], "-", state.get("finish_reason"))

final = client.post(f"/sessions/{sid}/finish").json()
events = [(e["group"] if e["action"] == "add" else -e["group"])
          for e in final["path"]["events"]]
print("signed event path:", events)
print("model groups:", final["model"]["active_groups"])
