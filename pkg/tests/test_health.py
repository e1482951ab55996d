from django.urls import reverse


def test_health(client, settings):
    settings.ENSEMBLE_MODEL_PATH = ""
    response = client.get(reverse("health-check"))
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok"
    assert body["model_configured"] is False
    assert body["workers"] == settings.POLAR_WORKERS
