from hypothesis import settings

# one deterministic profile for the whole suite; individual tests that
# need more examples or a deadline override locally
settings.register_profile("qtext", deadline=None, max_examples=50,
                          derandomize=True)
settings.load_profile("qtext")
