"""acid: automated classification of IaC defects.

Mines git repositories for commits touching programming-language IaC
programs (Pulumi, AWS CDK, CDK for Terraform, Terraform HCL), classifies
their enhanced commit messages into an eight-category defect taxonomy, and
aggregates prevalence metrics over the corpus.
"""

__version__ = "0.1.0"
