# Generated by Django 5.2.4 on 2026-10-17 08:12

import uuid
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='Knot',
            fields=[
                ('uid', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
                ('name', models.CharField(max_length=64, unique=True)),
                ('pd', models.JSONField(default=list, help_text='PD code as a list of 4-tuples')),
                ('loops', models.PositiveIntegerField(default=0, help_text='Crossingless components')),
                ('is_link', models.BooleanField(default=False)),
                ('a_poly', models.JSONField(blank=True, help_text='[coeff, deg_l, deg_m] terms', null=True)),
                ('vol', models.CharField(blank=True, default='', max_length=64)),
                ('closed_form', models.BooleanField(default=False)),
                ('ics_anchor', models.CharField(blank=True, default='', max_length=128)),
            ],
            options={
                'ordering': ['name'],
            },
        ),
    ]
