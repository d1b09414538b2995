"""
Слой представления: командная строка
"""
