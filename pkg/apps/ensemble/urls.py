from django.urls import path

from .views import DecodeView, LatencyView

urlpatterns = [
    path("decode/", DecodeView.as_view(), name="ensemble-decode"),
    path("latency/", LatencyView.as_view(), name="ensemble-latency"),
]
