import uuid
from django.db import models


class BaseModel(models.Model):
    uid = models.UUIDField(primary_key=True, editable=False, default=uuid.uuid4)
    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        abstract = True


class Knot(BaseModel):
    """One row of the knot table: a diagram plus optional geometric data."""

    name = models.CharField(max_length=64, unique=True)
    pd = models.JSONField(default=list, help_text="PD code as a list of 4-tuples")
    loops = models.PositiveIntegerField(default=0, help_text="Crossingless components")
    is_link = models.BooleanField(default=False)
    a_poly = models.JSONField(null=True, blank=True, help_text="[coeff, deg_l, deg_m] terms")
    vol = models.CharField(max_length=64, blank=True, default="")
    closed_form = models.BooleanField(default=False)
    ics_anchor = models.CharField(max_length=128, blank=True, default="")

    class Meta:
        ordering = ["name"]

    def __str__(self):
        return f"{self.name} ({len(self.pd)} crossings)"
