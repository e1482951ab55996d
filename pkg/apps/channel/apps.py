from django.apps import AppConfig


class ChannelConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.channel"
    verbose_name = "BPSK/AWGN channel"
