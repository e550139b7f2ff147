from django.apps import AppConfig


class FairnessAuditConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'fairness_audit'
    verbose_name = 'Fairness audit'
