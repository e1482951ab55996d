from django.apps import AppConfig


class CrcConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.crc"
    verbose_name = "CRC codec"
