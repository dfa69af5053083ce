import mpmath
from rest_framework import serializers

from .exceptions import DiagramError, UsageError
from .knotcore import PlanarDiagram
from .models import Knot
from .numerics import parse_u


class KnotEntrySerializer(serializers.Serializer):
    """One knot in the JSON table file."""

    name = serializers.CharField(max_length=64)
    pd = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(), min_length=4, max_length=4),
        allow_empty=True,
    )
    loops = serializers.IntegerField(min_value=0, default=0)
    is_link = serializers.BooleanField(default=False)
    a_poly = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(), min_length=3, max_length=3),
        required=False,
        allow_null=True,
    )
    vol = serializers.CharField(required=False, allow_blank=True, default="")
    closed_form = serializers.BooleanField(default=False)
    ics_anchor = serializers.CharField(required=False, allow_blank=True, default="")

    def validate_name(self, value):
        if not value.strip() or any(ch.isspace() for ch in value):
            raise serializers.ValidationError("Knot names cannot be blank or contain whitespace.")
        return value

    def validate_a_poly(self, value):
        if value is None:
            return value
        for coeff, deg_l, deg_m in value:
            if deg_l < 0 or deg_m < 0:
                raise serializers.ValidationError("A-polynomial degrees must be non-negative.")
        if all(coeff == 0 for coeff, _, _ in value):
            raise serializers.ValidationError("A-polynomial cannot be zero.")
        return value

    def validate_vol(self, value):
        if value:
            try:
                mpmath.mpf(value)
            except ValueError:
                raise serializers.ValidationError(f"'{value}' is not a decimal number.")
        return value

    def validate_ics_anchor(self, value):
        if value:
            try:
                parse_u(value)
            except UsageError as exc:
                raise serializers.ValidationError(str(exc))
        return value

    def validate(self, data):
        if not data["pd"] and data["loops"] == 0:
            raise serializers.ValidationError({"pd": "A diagram needs crossings or loops."})
        try:
            PlanarDiagram(
                tuple(tuple(c) for c in data["pd"]), loops=data["loops"], is_link=data["is_link"]
            )
        except DiagramError as exc:
            raise serializers.ValidationError({"pd": str(exc)})
        return data


class KnotTableSerializer(serializers.Serializer):
    knots = KnotEntrySerializer(many=True, allow_empty=False)

    def validate_knots(self, value):
        names = [entry["name"] for entry in value]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise serializers.ValidationError(f"Duplicate knot names: {', '.join(duplicates)}")
        return value


class KnotSerializer(serializers.ModelSerializer):
    crossings = serializers.SerializerMethodField()

    class Meta:
        model = Knot
        fields = ['uid', 'name', 'pd', 'loops', 'is_link', 'a_poly', 'vol', 'closed_form',
                  'ics_anchor', 'crossings']
        read_only_fields = ['uid']

    def get_crossings(self, obj):
        return len(obj.pd)
