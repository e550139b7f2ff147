from .job_models import AnalysisJob

__all__ = ['AnalysisJob']
