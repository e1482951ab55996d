import logging

import numpy as np
from drf_spectacular.utils import OpenApiParameter, extend_schema
from rest_framework import permissions, status
from rest_framework.response import Response
from rest_framework.views import APIView

from apps.core.exceptions import InvalidArgumentError, ResultsIOError
from apps.crc.codec import crc_message, crc_valid
from apps.polar.code import construct, extract

from .decoder import ensemble_decode
from .latency import count_weights, estimate_latency, single_decoder_latency
from .model import configured_model
from .serializers import (
    DecodeRequestSerializer,
    DecodeResponseSerializer,
    LatencyQuerySerializer,
    LatencyResponseSerializer,
)

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_LEN = 128
DEFAULT_ITERATIONS = 5


def _load_model():
    try:
        return configured_model(), None
    except (ResultsIOError, InvalidArgumentError) as exc:
        logger.error("Configured ensemble model is unusable: %s", exc)
        return None, Response({"detail": str(exc)}, status=status.HTTP_503_SERVICE_UNAVAILABLE)


class DecodeView(APIView):
    """Decode one LLR word with the configured ensemble."""

    permission_classes = [permissions.AllowAny]

    @extend_schema(request=DecodeRequestSerializer, responses=DecodeResponseSerializer)
    def post(self, request):
        model, error = _load_model()
        if error is not None:
            return error
        if model is None:
            return Response(
                {"detail": "No ensemble model configured (set ENSEMBLE_MODEL_PATH)"},
                status=status.HTTP_503_SERVICE_UNAVAILABLE,
            )
        serializer = DecodeRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        llr = np.asarray(serializer.validated_data["llr"], dtype=np.float64)
        try:
            outcome = ensemble_decode(llr, model)
        except InvalidArgumentError as exc:
            return Response({"detail": str(exc)}, status=status.HTTP_400_BAD_REQUEST)
        codeword = extract(outcome.word, model.code)
        data = {
            "padded_word": outcome.word.tolist(),
            "message": crc_message(codeword, model.crc).tolist(),
            "crc_ok": bool(crc_valid(codeword, model.crc)),
            "path": outcome.path.value,
            "member": outcome.member,
            "members_invoked": outcome.members_invoked,
        }
        return Response(DecodeResponseSerializer(data).data)


class LatencyView(APIView):
    """Expected ensemble latency for a given gate failure probability."""

    permission_classes = [permissions.AllowAny]

    @extend_schema(
        parameters=[
            OpenApiParameter("gate_fail_prob", float, required=True),
            OpenApiParameter("block_len", int),
            OpenApiParameter("iterations", int),
            OpenApiParameter("alpha", int),
        ],
        responses=LatencyResponseSerializer,
    )
    def get(self, request):
        query = LatencyQuerySerializer(data=request.query_params)
        query.is_valid(raise_exception=True)
        params = query.validated_data
        model, _ = _load_model()
        block_len = params.get("block_len") or (model.code.block_len if model else DEFAULT_BLOCK_LEN)
        iterations = params.get("iterations") or (model.iterations if model else DEFAULT_ITERATIONS)
        alpha = params.get("alpha", model.alpha if model else None)
        try:
            code = model.code if model and model.code.block_len == block_len else construct(block_len, block_len // 2)
            latency = estimate_latency(params["gate_fail_prob"], code, iterations)
            weights = count_weights(code, iterations, alpha) if alpha is not None else None
        except InvalidArgumentError as exc:
            return Response({"detail": str(exc)}, status=status.HTTP_400_BAD_REQUEST)
        data = {
            "gate_fail_prob": params["gate_fail_prob"],
            "block_len": block_len,
            "iterations": iterations,
            "latency": latency,
            "single_decoder_latency": single_decoder_latency(block_len, iterations),
            "alpha": alpha,
            "ensemble_weights": weights,
        }
        return Response(LatencyResponseSerializer(data).data)
