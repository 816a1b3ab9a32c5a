"""Part-aware, language-conditioned dexterous grasp generation at desk scale."""

__version__ = "0.1.0"
