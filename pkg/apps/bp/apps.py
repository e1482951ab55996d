from django.apps import AppConfig


class BpConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.bp"
    verbose_name = "Belief propagation"
