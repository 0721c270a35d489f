"""Walkthrough: a full HTTP session against the service, in process.

Creates a session, uploads a small report, analyzes uploads + backend,
filters by class, searches with highlight spans, and deletes the session.
Uses the test client so no port is bound; `claimsift serve` runs the same
app over uvicorn.

Run:  python demos/03_service_session.py
"""

import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from claimsift.demo import generate_demo_corpus
from claimsift.service import ServiceConfig, create_app

workdir = Path(tempfile.mkdtemp(prefix="claimsift-svc-"))
generate_demo_corpus(seed=7, out_dir=workdir)
app = create_app(ServiceConfig(corpus_dir=workdir))
client = TestClient(app)

sid = client.post("/api/session").json()["session_id"]
print(f"session: {sid}")

report = (
    "The annual report confirms that a living wage dispute at H&M suppliers grew. "
    "A public review outlines the broader picture this quarter. "
    "The detailed summary notes that carbon emissions fell across the sector."
)
uploaded = client.post(
    f"/api/session/{sid}/upload", files={"file": ("report.txt", report.encode(), "text/plain")}
).json()
print(f"uploaded: {uploaded}")

summary = client.post(
    f"/api/session/{sid}/analyze", json={"use_uploads": True, "use_backend": True}
).json()
print(f"analyze: total={summary['total']}, classes with hits={len(summary['distribution'])}")

wages = client.get(f"/api/session/{sid}/results", params={"class": 0, "page_size": 3}).json()
print(f"\nclass 0 filter: {wages['total']} passages; first page:")
for row in wages["passages"]:
    print(f"  [{row['origin']}] {row['text'][:70]}... -> {row['source_link']}")

searched = client.get(
    f"/api/session/{sid}/results", params={"class": 0, "q": "wage", "page_size": 3}
).json()
first = searched["passages"][0]
print(f"\nsearch 'wage' within class 0: {searched['total']} passages")
print(f"  spans on first hit: {first['match_spans']} "
      f"-> {[first['text'][a:b] for a, b in first['match_spans']]}")

client.delete(f"/api/session/{sid}")
print(f"\nsession deleted; results now -> {client.get(f'/api/session/{sid}/results').status_code}")
