import json
import threading

import pytest
from fastapi.testclient import TestClient

from conftest import JOHN_TEXT, fixture_records
from mwpr.corpus import build_index
from mwpr.service import create_app
from test_providers import _StubHandler, closed_port

ERROR_CODES = {"PARSE_ERROR", "NOT_FOUND", "DUPLICATE_ID", "BAD_REQUEST",
               "PROVIDER_ERROR", "INTERNAL"}


@pytest.fixture
def client(fixture_corpus):
    app = create_app(fixture_corpus)
    with TestClient(app) as test_client:
        yield test_client


def assert_api_error(response, status, code):
    assert response.status_code == status
    body = response.json()
    assert body["code"] == code
    assert body["code"] in ERROR_CODES
    assert isinstance(body["message"], str) and body["message"]


class TestQueryEndpoint:
    def test_query_by_equation(self, client):
        response = client.post("/api/query", json={
            "equation": "x = 5 + 6", "text": JOHN_TEXT, "k": 3})
        assert response.status_code == 200
        body = response.json()
        assert body["signature"] == "VAR VAR OP:+"
        assert body["parsedExpression"] == "N0 N1 +"
        assert [r["problemId"] for r in body["results"]] == ["q1", "q2"]
        assert all(r["signature"] == body["signature"]
                   for r in body["results"])
        assert body["results"][0]["lexScore"] == 1.0
        assert body["results"][0]["text"] == JOHN_TEXT
        assert response.headers["X-API-Version"] == "1"

    def test_byte_identical_repeat(self, client):
        payload = {"equation": "x = 5 + 6", "text": JOHN_TEXT}
        first = client.post("/api/query", json=payload)
        second = client.post("/api/query", json=payload)
        assert first.content == second.content

    def test_k_truncation(self, client):
        response = client.post("/api/query",
                               json={"equation": "x = 5 + 6", "k": 1})
        assert len(response.json()["results"]) == 1

    def test_exclude_id(self, client):
        response = client.post("/api/query", json={
            "equation": "x = 5 + 6", "excludeId": "q1"})
        assert [r["problemId"] for r in response.json()["results"]] == ["q2"]

    def test_missing_text_and_equation(self, client):
        assert_api_error(client.post("/api/query", json={"k": 3}),
                         400, "BAD_REQUEST")

    def test_invalid_k(self, client):
        assert_api_error(
            client.post("/api/query", json={"equation": "N0", "k": 0}),
            400, "BAD_REQUEST")

    def test_parse_error_carries_stage(self, client):
        response = client.post("/api/query",
                               json={"equation": "x = 5 + + 6"})
        assert_api_error(response, 400, "PARSE_ERROR")
        assert response.json()["detail"]["stage"] == "to_postfix"

    def test_unknown_signature_gives_empty_results(self, client):
        response = client.post("/api/query", json={"equation": "N0 ^ N1"})
        assert response.status_code == 200
        assert response.json()["results"] == []

    def test_text_only_with_gold_provider_is_rejected(self, client):
        assert_api_error(client.post("/api/query", json={"text": JOHN_TEXT}),
                         400, "BAD_REQUEST")


class TestRemoteProviderPath:
    def test_text_only_query_via_stub_generator(self, fixture_corpus):
        from http.server import HTTPServer

        server = HTTPServer(("127.0.0.1", 0), _StubHandler)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            url = f"http://127.0.0.1:{server.server_address[1]}/ok"
            app = create_app(fixture_corpus, generator_url=url)
            with TestClient(app) as client:
                response = client.post("/api/query", json={
                    "text": JOHN_TEXT, "provider": "remote"})
                assert response.status_code == 200
                body = response.json()
                assert body["signature"] == "VAR VAR OP:+"
                assert {r["problemId"] for r in body["results"]} \
                    == {"q1", "q2"}
        finally:
            server.shutdown()
            thread.join(timeout=5)

    def test_generator_down_is_502(self, fixture_corpus):
        url = f"http://127.0.0.1:{closed_port()}/ok"
        app = create_app(fixture_corpus, generator_url=url,
                         generator_timeout_ms=500)
        with TestClient(app) as client:
            response = client.post("/api/query", json={
                "text": JOHN_TEXT, "provider": "remote"})
            assert_api_error(response, 502, "PROVIDER_ERROR")

    def test_no_generator_configured(self, client):
        assert_api_error(
            client.post("/api/query",
                        json={"text": JOHN_TEXT, "provider": "remote"}),
            400, "BAD_REQUEST")


class TestProblemEndpoints:
    def test_add_problem(self, client):
        response = client.post("/api/problems", json={
            "id": "q4", "text": "Rex hid 7 bones and dug up 2 more, total?",
            "equation": "x = 7 + 2"})
        assert response.status_code == 201
        assert response.json() == {"id": "q4", "indexed": True, "error": None}
        stats = client.get("/api/stats").json()
        assert stats["total"] == 4
        assert stats["largestBucket"] == 3

    def test_duplicate_id(self, client):
        response = client.post("/api/problems", json={
            "id": "q1", "text": "again 1", "equation": "N0"})
        assert_api_error(response, 409, "DUPLICATE_ID")

    def test_unparseable_added_but_not_indexed(self, client):
        response = client.post("/api/problems", json={
            "id": "q5", "text": "odd 1 problem", "equation": "x = y = 1"})
        assert response.status_code == 201
        body = response.json()
        assert body["indexed"] is False
        assert body["error"]
        assert client.get("/api/problems/q5").status_code == 200
        assert client.get("/api/stats").json()["failed"] == 1

    def test_get_problem(self, client):
        response = client.get("/api/problems/q1")
        assert response.status_code == 200
        body = response.json()
        assert body["id"] == "q1"
        assert body["equation"] == "x = 5 + 6"
        assert body["textNumbers"] == [5.0, 6.0]

    def test_get_unknown_problem(self, client):
        assert_api_error(client.get("/api/problems/nope"), 404, "NOT_FOUND")

    def test_invalid_body(self, client):
        assert_api_error(client.post("/api/problems", json={"id": "x"}),
                         400, "BAD_REQUEST")


class TestStats:
    def test_fixture_stats(self, client):
        assert client.get("/api/stats").json() == {
            "total": 3, "indexed": 3, "failed": 0,
            "buckets": 2, "largestBucket": 2}


class TestConcurrency:
    def test_queries_stay_consistent_during_adds(self, fixture_corpus):
        app = create_app(fixture_corpus)
        errors = []
        with TestClient(app) as client:
            def add_many():
                for i in range(25):
                    response = client.post("/api/problems", json={
                        "id": f"new{i}",
                        "text": f"Kim got {i + 1} pears and 6 plums, total?",
                        "equation": f"x = {i + 1} + 6"})
                    if response.status_code != 201:
                        errors.append(response.text)

            def query_many():
                for _ in range(50):
                    response = client.post("/api/query", json={
                        "equation": "x = 5 + 6", "k": 100})
                    if response.status_code != 200:
                        errors.append(response.text)
                        continue
                    body = response.json()
                    # a response never mixes buckets: every result carries
                    # the query signature
                    if any(r["signature"] != body["signature"]
                           for r in body["results"]):
                        errors.append("mixed signatures")

            threads = [threading.Thread(target=add_many)] + \
                      [threading.Thread(target=query_many) for _ in range(3)]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
            assert errors == []
            stats = client.get("/api/stats").json()
            assert stats["total"] == 28
            assert stats["indexed"] == 28
