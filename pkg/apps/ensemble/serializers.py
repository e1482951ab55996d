"""Serializers for the model file format and the decode/latency endpoints."""

import math

from rest_framework import serializers

from apps.bp.decoder import BoxPlusMode
from apps.crc.partition import PartitionKind


class PolarCodeSerializer(serializers.Serializer):
    block_len = serializers.IntegerField(min_value=2)
    info_len = serializers.IntegerField(min_value=1)
    design_param = serializers.FloatField()
    reliable_positions = serializers.ListField(
        child=serializers.IntegerField(min_value=0), required=False
    )


class CrcSerializer(serializers.Serializer):
    generator_poly = serializers.CharField(max_length=66)
    message_len = serializers.IntegerField(min_value=1)


class PartitionSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=[kind.value for kind in PartitionKind])
    alpha = serializers.IntegerField(min_value=1)


class EnsembleModelSerializer(serializers.Serializer):
    """On-disk ensemble model: code, CRC, partition and one weight tensor per member."""

    format = serializers.IntegerField(min_value=1)
    code = PolarCodeSerializer()
    crc = CrcSerializer()
    iterations = serializers.IntegerField(min_value=1)
    mode = serializers.ChoiceField(choices=[mode.value for mode in BoxPlusMode])
    partition = PartitionSerializer(allow_null=True)
    members = serializers.ListField(child=serializers.JSONField(), allow_empty=True)
    metadata = serializers.DictField(required=False, default=dict)

    def validate(self, data):
        alpha = data["partition"]["alpha"] if data["partition"] else 0
        if len(data["members"]) != alpha:
            raise serializers.ValidationError(
                f"partition declares alpha={alpha} but the file holds {len(data['members'])} members"
            )
        return data


class DecodeRequestSerializer(serializers.Serializer):
    llr = serializers.ListField(child=serializers.FloatField(), min_length=2)

    def validate_llr(self, value):
        if not all(math.isfinite(v) for v in value):
            raise serializers.ValidationError("LLRs must be finite numbers")
        return value


class DecodeResponseSerializer(serializers.Serializer):
    padded_word = serializers.ListField(child=serializers.IntegerField())
    message = serializers.ListField(child=serializers.IntegerField())
    crc_ok = serializers.BooleanField()
    path = serializers.CharField()
    member = serializers.IntegerField()
    members_invoked = serializers.IntegerField()


class LatencyQuerySerializer(serializers.Serializer):
    gate_fail_prob = serializers.FloatField(min_value=0.0, max_value=1.0)
    block_len = serializers.IntegerField(min_value=2, required=False)
    iterations = serializers.IntegerField(min_value=1, required=False)
    alpha = serializers.IntegerField(min_value=0, required=False)


class LatencyResponseSerializer(serializers.Serializer):
    gate_fail_prob = serializers.FloatField()
    block_len = serializers.IntegerField()
    iterations = serializers.IntegerField()
    latency = serializers.FloatField()
    single_decoder_latency = serializers.FloatField()
    alpha = serializers.IntegerField(allow_null=True)
    ensemble_weights = serializers.IntegerField(allow_null=True)
