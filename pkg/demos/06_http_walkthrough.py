#!/usr/bin/env python3
"""Driving the HTTP service end to end with nothing but the standard library.

Starts the service in-process on a local port, registers a learner,
answers the questionnaire, then walks pre-test -> presentation ->
post-test until the curriculum completes.
"""

import json
import random
import threading
import time
import urllib.error
import urllib.request
from importlib import resources

import uvicorn

from adaptutor.service import ServiceSettings, create_app

PORT = 8765
BASE = f"http://127.0.0.1:{PORT}"

# The client never sees answer keys over the wire; for the scripted demo we
# read them from the local content file instead.
with resources.files("adaptutor.data").joinpath("sample_kb.json").open("rb") as fh:
    ANSWER_KEY = {qid: q["correct_index"] for qid, q in json.load(fh)["questions"].items()}


def call(method, path, token=None, payload=None):
    request = urllib.request.Request(f"{BASE}{path}", method=method)
    request.add_header("Content-Type", "application/json")
    if token:
        request.add_header("Authorization", f"Bearer {token}")
    data = json.dumps(payload).encode() if payload is not None else None
    with urllib.request.urlopen(request, data=data) as response:
        return json.load(response)


def main():
    import tempfile

    app = create_app(ServiceSettings(data_dir=tempfile.mkdtemp(prefix="tutor_demo_")))
    config = uvicorn.Config(app, host="127.0.0.1", port=PORT, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    while not server.started:
        time.sleep(0.05)

    registered = call("POST", "/api/learners", payload={"name": "demo learner"})
    token = registered["token"]
    print(f"registered learner {registered['learner_id'][:8]}…")

    session = call("POST", "/api/sessions", token=token)
    sid = session["session_id"]

    # A middling learner: answers each question correctly 70% of the time.
    rng = random.Random(12)
    for _ in range(80):
        try:
            body = call("GET", f"/api/sessions/{sid}/step", token=token)
        except urllib.error.HTTPError as err:
            print(f"stopping: HTTP {err.code} ({json.load(err).get('code')})")
            break
        step = body["step"]
        if step["type"] == "questionnaire":
            print(f"questionnaire: {len(step['items'])} items")
            call("POST", f"/api/sessions/{sid}/submit", token=token,
                 payload={"responses": {i["id"]: 4 for i in step["items"]}})
        elif step["type"] == "test":
            answers = {
                q["id"]: ANSWER_KEY[q["id"]] if rng.random() < 0.7
                else (ANSWER_KEY[q["id"]] + 1) % len(q["choices"])
                for q in step["questions"]
            }
            result = call("POST", f"/api/sessions/{sid}/submit", token=token,
                          payload={"answers": answers})["result"]
            print(f"{step['phase']:>8} {step['concept_id']}: score {result['score']:>3} "
                  f"-> {result['decision']}")
        elif step["type"] == "presentation":
            print(f"    teach {step['concept_id']} via {step['method']}")
        else:
            print("\ncompleted; per-topic aggregates:")
            for topic in step["topics"]:
                print(f"  {topic['title']}: {topic['score']}")
            break

    model = call("GET", f"/api/learners/{registered['learner_id']}/model", token=token)
    print(f"learner level: {model['learner_level']}")
    server.should_exit = True
    thread.join(timeout=5)


if __name__ == "__main__":
    main()
