"""Session-based HTTP service: upload, analyze, filter/search, delete.

Endpoints (JSON bodies, ``{"error": ...}`` on failure):

    POST   /api/session                          -> {"session_id"}
    POST   /api/session/{id}/upload              multipart field "file"
    POST   /api/session/{id}/analyze             {"use_uploads","use_backend"}
    GET    /api/session/{id}/results?class=&q=&page=&page_size=
    DELETE /api/session/{id}

The backend corpus is loaded and classified once at startup and shared
read-only; each session owns an isolated storage directory that is removed
on DELETE or after the idle TTL expires.
"""

from __future__ import annotations

import json
import logging
import shutil
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Query, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel
from starlette.exceptions import HTTPException as StarletteHTTPException

from .classify import import_scores, keyword_classify, threshold_predict
from .corpus import filter_passages, is_english, load_passages, window_passages
from .schema import (
    Document,
    Passage,
    SchemaError,
    load_lexicon,
    load_schema,
    read_jsonl,
)
from .svm import load_svm, svm_predict
from .tfidf import load_tfidf, tfidf_transform

logger = logging.getLogger(__name__)

DEFAULT_TTL_SECONDS = 30 * 60
MAX_UPLOAD_BYTES = 10 * 2**20
DEFAULT_PAGE_SIZE = 50
MAX_PAGE_SIZE = 500
CANNOT_BE_PROCESSED = "cannot be processed"
NO_RESULTS_MESSAGE = "no results found"


class ServiceError(Exception):
    def __init__(self, status_code: int, message: str):
        super().__init__(message)
        self.status_code = status_code
        self.message = message


@dataclass
class ServiceConfig:
    corpus_dir: Path
    model_dir: Optional[Path] = None
    scores_path: Optional[Path] = None
    threshold: float = 0.33
    classifier: str = "auto"  # keyword | keyword+svm | score-matrix | auto
    session_ttl_seconds: int = DEFAULT_TTL_SECONDS
    max_upload_bytes: int = MAX_UPLOAD_BYTES
    session_root: Optional[Path] = None
    frontend_dir: Optional[Path] = None
    host: str = "127.0.0.1"
    port: int = 8000

    @classmethod
    def from_file(cls, path: str | Path) -> "ServiceConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        kwargs = dict(raw)
        for key in ("corpus_dir", "model_dir", "scores_path", "session_root", "frontend_dir"):
            if kwargs.get(key) is not None:
                kwargs[key] = Path(kwargs[key])
        return cls(**kwargs)


def source_link(document: Document) -> str:
    """Traceable source reference: DOI link, NGO website, or the upload's file name."""
    if document.source_type == "scientific":
        return "https://doi.org/" + document.doi
    if document.source_type == "ngo":
        return document.website
    return document.filename


@dataclass
class ResultPassage:
    passage_id: str
    text: str
    class_ids: tuple[int, ...]
    source_link: str
    origin: str  # backend | upload


@dataclass
class AnalysisResult:
    passages: list[ResultPassage]
    message: Optional[str] = None

    @property
    def total(self) -> int:
        return len(self.passages)

    def distribution(self) -> dict[int, int]:
        dist: dict[int, int] = {}
        for entry in self.passages:
            for c in entry.class_ids:
                dist[c] = dist.get(c, 0) + 1
        return dict(sorted(dist.items()))


class AnalysisEngine:
    """Loads the backend corpus plus model artifacts and classifies passages."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        corpus = Path(config.corpus_dir)
        self.schema = load_schema(corpus / "schema.json")
        self.lexicon = load_lexicon(corpus / "lexicon.json")
        self.lexicon.validate(self.schema)
        self.documents = {}
        docs_path = corpus / "documents.jsonl"
        if docs_path.exists():
            for _, rec in read_jsonl(docs_path):
                doc = Document.from_dict(rec)
                self.documents[doc.id] = doc

        self.tfidf = None
        self.svm = None
        if config.model_dir is not None:
            self.tfidf = load_tfidf(Path(config.model_dir) / "vocabulary.tsv")
            self.svm = load_svm(Path(config.model_dir) / "weights.csv")

        self.classifier = config.classifier
        if self.classifier == "auto":
            if config.scores_path is not None:
                self.classifier = "score-matrix"
            elif self.svm is not None:
                self.classifier = "keyword+svm"
            else:
                self.classifier = "keyword"

        self.score_labels: dict[str, set[int]] = {}
        if self.classifier == "score-matrix":
            if config.scores_path is None:
                raise ServiceError(500, "score-matrix classifier requires scores_path")
            matrix = import_scores(config.scores_path)
            self.score_labels = threshold_predict(matrix, config.threshold).labels

        backend_passages = load_passages(corpus / "passages.jsonl")
        self.backend = self._build_entries(backend_passages, origin="backend")

    def classify(self, passage: Passage) -> set[int]:
        if self.classifier == "score-matrix" and passage.id in self.score_labels:
            return set(self.score_labels[passage.id])
        labels = keyword_classify(passage, self.lexicon)
        if self.svm is not None and self.classifier in ("keyword+svm", "score-matrix"):
            vec = tfidf_transform(self.tfidf, passage.text)
            labels |= svm_predict(self.svm, vec)[1]
        return labels

    def _build_entries(self, passages: list[Passage], origin: str) -> list[ResultPassage]:
        entries = []
        for passage in passages:
            labels = self.classify(passage)
            if not labels:
                continue  # only passages with a class label are kept
            doc = self.documents.get(passage.document_id)
            link = source_link(doc) if doc is not None else passage.document_id
            entries.append(
                ResultPassage(
                    passage_id=passage.id,
                    text=passage.text,
                    class_ids=tuple(sorted(labels)),
                    source_link=link,
                    origin=origin,
                )
            )
        return entries

    def process_uploads(self, documents: list[Document]) -> list[ResultPassage]:
        """Run the full pipeline on upload documents: English filter, segment,
        window, keyword filter, classify, keep only labeled passages."""
        passages: list[Passage] = []
        for doc in documents:
            if not is_english(doc.text):
                continue
            windows = window_passages(doc)
            passages.extend(filter_passages(windows, self.lexicon))
        doc_map = {doc.id: doc for doc in documents}
        entries = []
        for passage in passages:
            labels = self.classify(passage)
            if not labels:
                continue
            entries.append(
                ResultPassage(
                    passage_id=passage.id,
                    text=passage.text,
                    class_ids=tuple(sorted(labels)),
                    source_link=source_link(doc_map[passage.document_id]),
                    origin="upload",
                )
            )
        return entries


@dataclass
class UploadRecord:
    upload_id: str
    filename: str
    size: int
    path: Path


@dataclass
class Session:
    session_id: str
    storage_dir: Path
    created_at: float
    last_active: float
    uploads: list[UploadRecord] = field(default_factory=list)
    result: Optional[AnalysisResult] = None
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """Thread-safe registry; expired sessions are purged lazily on access."""

    def __init__(self, root: Path, ttl_seconds: int):
        self.root = root
        self.ttl = ttl_seconds
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        root.mkdir(parents=True, exist_ok=True)

    def create(self) -> Session:
        sid = str(uuid.uuid4())
        storage = self.root / sid
        storage.mkdir(parents=True)
        now = time.monotonic()
        session = Session(session_id=sid, storage_dir=storage, created_at=now, last_active=now)
        with self._lock:
            self._sessions[sid] = session
        return session

    def get(self, session_id: str) -> Session:
        self.sweep()
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise ServiceError(404, f"unknown or expired session {session_id}")
            session.last_active = time.monotonic()
            return session

    def delete(self, session_id: str) -> None:
        with self._lock:
            session = self._sessions.pop(session_id, None)
        if session is None:
            raise ServiceError(404, f"unknown or expired session {session_id}")
        shutil.rmtree(session.storage_dir, ignore_errors=True)

    def sweep(self) -> None:
        now = time.monotonic()
        with self._lock:
            expired = [
                sid
                for sid, session in self._sessions.items()
                if now - session.last_active > self.ttl
            ]
            sessions = [self._sessions.pop(sid) for sid in expired]
        for session in sessions:
            logger.info("expiring idle session %s", session.session_id)
            shutil.rmtree(session.storage_dir, ignore_errors=True)


class AnalyzeBody(BaseModel):
    use_uploads: bool = False
    use_backend: bool = False


def _looks_binary(data: bytes) -> bool:
    if data.startswith(b"%PDF-"):
        return True
    if b"\x00" in data:
        return True
    try:
        data.decode("utf-8")
    except UnicodeDecodeError:
        return True
    return False


def _documents_from_upload(record: UploadRecord) -> list[Document]:
    text = record.path.read_text("utf-8")
    if record.filename.lower().endswith(".jsonl"):
        docs = []
        try:
            for lineno, rec in read_jsonl(record.path):
                rec = dict(rec)
                rec["id"] = f"{record.upload_id}:{rec.get('id', lineno)}"
                docs.append(Document.from_dict(rec))
        except SchemaError as exc:
            raise ServiceError(400, f"uploaded file {record.filename!r} {CANNOT_BE_PROCESSED}: {exc}")
        return docs
    return [
        Document(
            id=record.upload_id,
            title=record.filename,
            source_type="upload",
            filename=record.filename,
            text=text,
        )
    ]


def _entry_json(entry: ResultPassage, spans: list[tuple[int, int]]) -> dict:
    return {
        "passage_id": entry.passage_id,
        "text": entry.text,
        "class_ids": list(entry.class_ids),
        "source_link": entry.source_link,
        "origin": entry.origin,
        "match_spans": [list(span) for span in spans],
    }


def _find_spans(text: str, query: str) -> list[tuple[int, int]]:
    """Non-overlapping case-insensitive occurrences as code-point offsets."""
    spans = []
    haystack = text.lower()
    needle = query.lower()
    start = 0
    while True:
        pos = haystack.find(needle, start)
        if pos < 0:
            break
        spans.append((pos, pos + len(needle)))
        start = pos + len(needle)
    return spans


def create_app(config: ServiceConfig) -> FastAPI:
    engine = AnalysisEngine(config)
    session_root = config.session_root or (Path(config.corpus_dir) / "sessions")
    store = SessionStore(Path(session_root), config.session_ttl_seconds)

    app = FastAPI(title="claimsift", docs_url=None, redoc_url=None)
    app.state.engine = engine
    app.state.sessions = store

    @app.exception_handler(ServiceError)
    async def _service_error(_req: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status_code, content={"error": exc.message})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_req: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors()[:1])})

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(_req: Request, exc: StarletteHTTPException):
        return JSONResponse(status_code=exc.status_code, content={"error": str(exc.detail)})

    @app.post("/api/session", status_code=201)
    def create_session():
        session = store.create()
        return {"session_id": session.session_id}

    @app.post("/api/session/{session_id}/upload", status_code=201)
    def upload(session_id: str, file: UploadFile):
        session = store.get(session_id)
        data = file.file.read(config.max_upload_bytes + 1)
        if len(data) > config.max_upload_bytes:
            raise ServiceError(413, "uploaded file exceeds the 10 MB limit")
        filename = Path(file.filename or "upload.txt").name
        suffix = Path(filename).suffix.lower()
        if suffix not in (".txt", ".jsonl") or _looks_binary(data):
            raise ServiceError(
                400,
                f"uploaded file {filename!r} {CANNOT_BE_PROCESSED}: "
                "only UTF-8 .txt or .jsonl documents are supported",
            )
        with session.lock:
            upload_id = f"u{len(session.uploads) + 1:03d}"
            stored = session.storage_dir / f"{upload_id}-{filename}"
            stored.write_bytes(data)
            record = UploadRecord(
                upload_id=upload_id, filename=filename, size=len(data), path=stored
            )
            session.uploads.append(record)
        return {"upload_id": record.upload_id, "filename": record.filename, "size": record.size}

    @app.post("/api/session/{session_id}/analyze")
    def analyze(session_id: str, body: AnalyzeBody):
        session = store.get(session_id)
        if not body.use_uploads and not body.use_backend:
            raise ServiceError(400, "select at least one data source")
        with session.lock:
            entries: list[ResultPassage] = []
            message = None
            if body.use_uploads:
                documents = []
                for record in session.uploads:
                    documents.extend(_documents_from_upload(record))
                upload_entries = engine.process_uploads(documents)
                if not upload_entries:
                    message = (
                        "uploaded data lacks relevant content; nothing was classified"
                    )
                    if body.use_backend:
                        message += "; showing existing backend data"
                entries.extend(upload_entries)
            if body.use_backend:
                entries.extend(engine.backend)
            result = AnalysisResult(passages=entries, message=message)
            session.result = result
        response = {
            "distribution": {str(c): n for c, n in result.distribution().items()},
            "total": result.total,
        }
        if result.message:
            response["message"] = result.message
        return response

    @app.get("/api/session/{session_id}/results")
    def results(
        session_id: str,
        q: str = "",
        page: int = 1,
        page_size: int = DEFAULT_PAGE_SIZE,
        class_filter: Optional[int] = Query(None, alias="class"),
    ):
        session = store.get(session_id)
        if session.result is None:
            raise ServiceError(409, "analysis has not completed for this session")
        if class_filter is not None and class_filter not in set(engine.schema.class_ids):
            raise ServiceError(400, f"unknown class id {class_filter}")
        if page < 1:
            raise ServiceError(400, "page must be >= 1")
        if not 1 <= page_size <= MAX_PAGE_SIZE:
            raise ServiceError(400, f"page_size must be in [1, {MAX_PAGE_SIZE}]")

        entries = session.result.passages
        if class_filter is not None:
            entries = [e for e in entries if class_filter in e.class_ids]
        spans_by_id: dict[str, list[tuple[int, int]]] = {}
        if q:
            filtered = []
            for entry in entries:
                spans = _find_spans(entry.text, q)
                if spans:
                    filtered.append(entry)
                    spans_by_id[entry.passage_id] = spans
            entries = filtered

        dist: dict[int, int] = {}
        for entry in entries:
            for c in entry.class_ids:
                dist[c] = dist.get(c, 0) + 1
        start = (page - 1) * page_size
        page_entries = entries[start : start + page_size]
        payload = {
            "distribution": {str(c): n for c, n in sorted(dist.items())},
            "passages": [
                _entry_json(entry, spans_by_id.get(entry.passage_id, []))
                for entry in page_entries
            ],
            "total": len(entries),
        }
        if not entries:
            payload["message"] = NO_RESULTS_MESSAGE
        return payload

    @app.delete("/api/session/{session_id}")
    def end_session(session_id: str):
        store.delete(session_id)
        return {"deleted": session_id}

    if config.frontend_dir is not None and Path(config.frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(config.frontend_dir), html=True), name="ui")

    return app
