from hypothesis import HealthCheck, settings

# Exact-rational work has high per-example time variance (stage descents,
# box decompositions), so wall-clock deadlines only produce flaky failures.
settings.register_profile(
    "exact",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("exact")
