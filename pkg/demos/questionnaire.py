"""
Scoring a BFI-10 questionnaire
==============================

Turn ten Likert answers into a Big-Five profile and read off the dominant
trait. Items 3, 5, 7, 8 and 10 are reverse-keyed.
"""

from persorec import parse_mbti, score_bfi10, dominant_trait

# a fairly outgoing, slightly disorganised respondent
answers = [5, 2, 3, 4, 1, 4, 2, 2, 3, 4]
profile = score_bfi10(answers)
for name, value in profile.as_dict().items():
    print(f"{name:18s} {value:.3f}")

# the dominant trait is the largest score; ties go to the earlier trait
print("dominant:", dominant_trait(profile))

# MBTI types are parsed case-insensitively and validated letter by letter
print(parse_mbti("entp"), parse_mbti("ENTP").code)
